import boto3

s3 = boto3.client("s3")


def handler(event, context):
    bucket = "logs-" + event["tenant"]
    s3.put_object(Bucket=bucket, Key="audit.log", Body=event["line"])
    return {"ok": True}
